from patkit.bench.dataset import make_dataset, save_dataset
from patkit.cli.command import Command
from patkit.cli.handler.builtin.support import open_matrix, override, require
from patkit.cli.handler.result import HandlerResult
from patkit.config.bench import CaseSpec
from patkit.config.patkit import PatKitConfig
from patkit.exceptions import HandlerError


def parse_image_dirs(entries: list[str] | None) -> dict[str, str]:
    """``family=directory`` pairs from repeated ``--images`` flags."""
    dirs = {}
    for entry in entries or []:
        if '=' not in entry:
            raise HandlerError(f"--images expects family=directory, got '{entry}'")
        family, directory = entry.split('=', 1)
        dirs[family.strip()] = directory.strip()
    return dirs


class GenDataHandler:
    def __init__(self, config: PatKitConfig):
        self.config = config

    def handle(self, command: Command) -> HandlerResult:
        require(command, 'case', 'out')
        bench = override(
            self.config.bench,
            full_scale=command.get('full_scale') or None,
            image_dirs=parse_image_dirs(command.get('images')) or None,
        )
        spec = CaseSpec.standard(
            command.get('case'),
            full_scale=bench.full_scale,
            seed=command.get('seed', 7),
            n_train=command.get('n_train'),
            n_test=command.get('n_test'),
            noise_level=command.get('noise', 0.01),
        )
        A = open_matrix(command, self.config)
        dataset = make_dataset(spec, A, bench)
        save_dataset(dataset, command.get('out'), previews=command.get('previews', 0))
        return HandlerResult(
            message=[f"Case {spec.case}: {len(dataset)} samples written to {command.get('out')}"],
            details={'case': spec.case, 'count': len(dataset)},
        )
