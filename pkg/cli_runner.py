import argparse
import json
import logging
import sys
from typing import List, Optional

import colorama
from colorama import Fore, Style

from config import EXPERIMENTS, load_config, load_experiment
from errors import ConfigurationError, LadderSimError
from scheme import PRESETS
from simulator import LadderSimulator

logger = logging.getLogger(__name__)


def list_presets() -> str:
    lines = []
    for name in sorted(PRESETS):
        _, description = PRESETS[name]
        lines.append(f"{name}: {description}")
    return '\n'.join(lines)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog='ladder-sim',
        description='Simulate multi-photon ladder excitation of Rydberg atoms in focused laser beams.',
    )
    parser.add_argument('command', choices=EXPERIMENTS + ('presets',),
                        help="experiment to run, or 'presets' to list the built-in schemes")
    parser.add_argument('--config', help='experiment document (JSON)')
    parser.add_argument('--out', help='output directory (overrides output_path and LADDER_SIM_OUTPUT_DIR)')
    parser.add_argument('--nodes', type=int, help='radial quadrature nodes')
    parser.add_argument('--threads', type=int, help='worker threads for node and sweep evaluation')
    parser.add_argument('--log-level', help='logging level (default from LADDER_SIM_LOG_LEVEL)')
    return parser


def _report_error(exc: LadderSimError) -> int:
    print(f"{Fore.RED}Error: {exc}{Style.RESET_ALL}")
    sys.stderr.write(json.dumps(exc.to_dict(), sort_keys=True) + '\n')
    return exc.exit_code


def main(argv: Optional[List[str]] = None) -> int:
    colorama.init(autoreset=True)
    args = build_parser().parse_args(argv)
    settings = load_config()
    logging.basicConfig(level=(args.log_level or settings['LADDER_SIM_LOG_LEVEL']).upper())

    if args.command == 'presets':
        print(f"{Fore.CYAN}=== Built-in ladder schemes ==={Style.RESET_ALL}")
        print(list_presets())
        return 0

    try:
        if not args.config:
            raise ConfigurationError(f"'{args.command}' needs --config <path>")
        if args.nodes is not None and args.nodes < 8:
            raise ConfigurationError("--nodes must be at least 8")
        if args.threads is not None and args.threads < 1:
            raise ConfigurationError("--threads must be at least 1")
        config = load_experiment(args.config)
        if config.experiment != args.command:
            raise ConfigurationError(
                f"$.experiment: document selects '{config.experiment}' but the command line asked for '{args.command}'"
            )
        simulator = LadderSimulator(settings, n_nodes=args.nodes, threads=args.threads)
        print(f"{Fore.GREEN}Running {config.experiment} experiment...{Style.RESET_ALL}")
        report = simulator.run(config, output_dir=args.out)
    except LadderSimError as exc:
        return _report_error(exc)

    print(f"\n{Fore.CYAN}=== {report['experiment']} finished ==={Style.RESET_ALL}")
    for key, value in report['summary'].items():
        print(f"{Fore.YELLOW}{key}:{Style.RESET_ALL} {value}")
    print(f"{Fore.GREEN}Outputs in {report['output_dir']}: {', '.join(report['files'])}{Style.RESET_ALL}")
    return 0


if __name__ == "__main__":
    sys.exit(main())
