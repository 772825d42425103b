from patkit.bench.experiment import run_cases
from patkit.cli.command import Command
from patkit.cli.handler.builtin.support import open_matrix, override, require
from patkit.cli.handler.result import HandlerResult
from patkit.config.patkit import PatKitConfig


class RunCaseHandler:
    def __init__(self, config: PatKitConfig):
        self.config = config

    def handle(self, command: Command) -> HandlerResult:
        require(command, 'case')
        bench = self.config.bench
        methods = command.get('methods')
        bench = override(
            bench,
            methods=tuple(m.strip() for m in methods.split(',')) if methods else None,
            full_scale=command.get('full_scale') or None,
            train=override(bench.train, n_steps=command.get('steps')),
        )
        cases = [c.strip() for c in command.get('case').split(',')]
        out = command.get('out', self.config.output_dir)
        A = open_matrix(command, self.config)
        report = run_cases(cases, A, bench, out, self.config.solver,
                           seed=command.get('seed', 7), noise_level=command.get('noise', 0.01))
        return HandlerResult(
            message=[report.summary().to_string(index=False), f"Report written to {out}"],
            details={'cases': cases, 'methods': list(bench.methods)},
        )
