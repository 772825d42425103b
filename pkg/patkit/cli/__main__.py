import logging
import sys
from argparse import SUPPRESS, ArgumentParser

from pyaml_env import parse_config as parse_config_with_env
from pydantic import ValidationError

from patkit.cli.command import Command
from patkit.cli.handler.builtin.reconstruct import METHODS
from patkit.cli.session import Response, Session
from patkit.config.patkit import PatKitConfig
from patkit.exceptions import ConfigError, PatKitError
from patkit.tracer import Tracer, YAMLExporter, trace_session

logger = logging.getLogger(__name__)

ARCHITECTURES = ['fl', 'unet', 'pre', 'lgd', 'lpd',
                 'fully-learned', 'postproc-unet', 'preproc-cnn', 'learned-gd', 'learned-pd']


def build_parser() -> ArgumentParser:
    # --config is accepted before or after the subcommand
    shared = ArgumentParser(add_help=False)
    shared.add_argument('--config', default=SUPPRESS, help="Path to a YAML configuration file")
    parser = ArgumentParser('patkit', description="Photoacoustic reconstruction toolkit", parents=[shared])
    parser.add_argument('-v', action='count', default=0, help="Verbosity level. -v for INFO, -vv for DEBUG")
    commands = parser.add_subparsers(dest='command', required=True)

    assemble = commands.add_parser('assemble-matrix', parents=[shared], help="Assemble and store the forward matrix")
    assemble.add_argument('--out', required=True)
    assemble.add_argument('--m', type=int)
    assemble.add_argument('--n-det', type=int)
    assemble.add_argument('--n-t', type=int)
    assemble.add_argument('--aperture', choices=['top', 'full'])
    assemble.add_argument('--workers', type=int)

    recon = commands.add_parser('reconstruct', parents=[shared], help="Reconstruct images from sensor data")
    recon.add_argument('--method', required=True, choices=METHODS)
    recon.add_argument('--data', required=True, help="PATT file of (n_det, n_t) or (B, n_det, n_t) data")
    recon.add_argument('--out', required=True, help="PATT file receiving the image(s)")
    recon.add_argument('--matrix')
    recon.add_argument('--ckpt', help="Checkpoint of a trained network for --method learned")
    recon.add_argument('--alpha', type=float)
    recon.add_argument('--eta', type=float, help="Step size of gd and pgd-tv; defaults to 1 / ||A||^2")
    recon.add_argument('--iters', type=int)
    recon.add_argument('--pgm', help="Also write the first image as PGM")

    train = commands.add_parser('train', parents=[shared], help="Train a learned reconstruction")
    train.add_argument('--arch', required=True, choices=ARCHITECTURES)
    train.add_argument('--train', required=True, help="Dataset directory")
    train.add_argument('--val', help="Dataset directory for validation; defaults to --train")
    train.add_argument('--matrix')
    train.add_argument('--steps', type=int)
    train.add_argument('--lr', type=float)
    train.add_argument('--batch', type=int)
    train.add_argument('--seed', type=int)
    train.add_argument('--greedy', action='store_true', help="Block-wise training (learned-gd only)")
    train.add_argument('--log', help="Loss curve CSV")
    train.add_argument('--out', required=True, help="Checkpoint file")

    gen = commands.add_parser('gen-data', parents=[shared], help="Simulate a training / test dataset")
    gen.add_argument('--case', required=True, choices=['i', 'ii', 'iii'])
    gen.add_argument('--out', required=True)
    gen.add_argument('--matrix')
    gen.add_argument('--n-train', type=int)
    gen.add_argument('--n-test', type=int)
    gen.add_argument('--seed', type=int)
    gen.add_argument('--noise', type=float)
    gen.add_argument('--paper-scale', '--full-scale', dest='full_scale', action='store_true',
                     help="Large sample counts and 5e4 training steps")
    gen.add_argument('--images', action='append', help="family=directory of PGM phantoms")
    gen.add_argument('--previews', type=int, help="Write PGM previews of the first N samples")

    case = commands.add_parser('run-case', parents=[shared], help="Run the three-case comparison")
    case.add_argument('--case', required=True, help="Comma-separated cases, e.g. i,ii,iii")
    case.add_argument('--methods', help="Comma-separated methods: fl,unet,pre,lgd,lpd,lgd-greedy,pgd-tv")
    case.add_argument('--matrix')
    case.add_argument('--steps', type=int)
    case.add_argument('--seed', type=int)
    case.add_argument('--noise', type=float)
    case.add_argument('--paper-scale', '--full-scale', dest='full_scale', action='store_true',
                      help="Large sample counts and 5e4 training steps")
    case.add_argument('--out')

    evaluate = commands.add_parser('evaluate', parents=[shared], help="PSNR and SSIM of a prediction")
    evaluate.add_argument('--pred', required=True)
    evaluate.add_argument('--truth', required=True)
    return parser


def load_config(config_path: str | None) -> PatKitConfig:
    if config_path is None:
        return PatKitConfig()
    with open(config_path, 'r', encoding='utf-8') as f:
        config = parse_config_with_env(data=f, tag=None)
    try:
        return PatKitConfig.model_validate(config or {})
    except ValidationError as e:
        raise ConfigError(f"Invalid configuration {config_path}: {e}")


@trace_session(name_arg='command', label=lambda command: command.handler)
def invoke(session: Session, command: Command) -> Response:
    return session.invoke(command)


def run(command: Command, config: PatKitConfig) -> list[str]:
    session = Session.from_config(config)
    if config.trace_dir is None:
        return invoke(session, command).messages
    tracer = Tracer(exporter=YAMLExporter(output_dir=config.trace_dir))
    token = tracer.activate()
    try:
        return invoke(session, command).messages
    finally:
        tracer.deactivate(token)


def main(argv: list[str] | None = None) -> int:
    ns = build_parser().parse_args(argv)
    level = [logging.WARNING, logging.INFO, logging.DEBUG][min(ns.v, 2)]
    logging.basicConfig(level=level)

    options = {k: v for k, v in vars(ns).items() if k not in ('command', 'config', 'v')}
    command = Command(handler=ns.command, options=options)
    try:
        config = load_config(getattr(ns, 'config', None))
        logger.debug(f"Loaded config: {config}")
        for message in run(command, config):
            print(message)
    except PatKitError as e:
        print(f"Error: {e}", file=sys.stderr)
        return 1
    except KeyboardInterrupt:
        return 130
    except Exception:
        logger.exception("Unexpected failure in %s", ns.command)
        return 2
    return 0


if __name__ == "__main__":
    sys.exit(main())
