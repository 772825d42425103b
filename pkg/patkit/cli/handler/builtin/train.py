from pathlib import Path

from patkit.bench.dataset import Split, load_dataset
from patkit.cli.command import Command
from patkit.cli.handler.builtin.support import open_matrix, override, require
from patkit.cli.handler.result import HandlerResult
from patkit.config.patkit import PatKitConfig
from patkit.learned.architectures import build_recon_net
from patkit.learned.storage import save_recon_net
from patkit.learned.training import PairSet, TrainLog, train_greedy, train_supervised
from patkit.tracer import annotate, stage


class TrainHandler:
    def __init__(self, config: PatKitConfig):
        self.config = config

    def handle(self, command: Command) -> HandlerResult:
        require(command, 'arch', 'train', 'out')
        A = open_matrix(command, self.config)
        tcfg = override(
            self.config.bench.effective_train(),
            n_steps=command.get('steps'),
            learning_rate=command.get('lr'),
            batch_size=command.get('batch'),
            seed=command.get('seed'),
        )
        net = build_recon_net(command.get('arch'), self.config.bench.network, A.config, A)
        train = PairSet.from_dataset(load_dataset(command.get('train'), A).split(Split.Train), net)
        val = PairSet.from_dataset(load_dataset(command.get('val', command.get('train')), A).split(Split.Val), net)
        log = TrainLog()
        trainer = train_greedy if command.get('greedy', False) else train_supervised
        with stage("train", arch=net.arch.value, steps=tcfg.n_steps):
            trainer(net, train, tcfg, val if len(val) else None, log)
        out = Path(command.get('out'))
        save_recon_net(out, net)
        log_path = Path(command.get('log', out.with_name(out.stem + '_loss.csv')))
        log.save(log_path)
        annotate('param_count', net.param_count())
        return HandlerResult(
            message=[f"Trained {net.arch.value} ({net.param_count()} parameters) saved to {out}",
                     f"Loss curve written to {log_path}"],
            details={'arch': net.arch.value, 'steps': tcfg.n_steps},
        )
