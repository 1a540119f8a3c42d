#!/usr/bin/env python3
"""
🖥️ AMPUTATION CLI - Command-line interface over the amputation core

Results go to stdout, logs and errors to stderr. Exit codes: 0 success,
1 runtime error (one JSON line on stderr), 2 usage or configuration error.
"""

import argparse
import json
import logging
import sys
from typing import Any, Callable, Dict, List, Optional

from backend.errors import AmputationError, ConfigError
from backend.experiments import BIAS_PRESETS
from config.settings import Config
from .commands import CommandHandlers

logger = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_RUNTIME = 1
EXIT_USAGE = 2

COPULA_CHOICES = ('independence', 'comonotone', 'countermonotone', 'homogeneous-gauss')


def _add_run_flags(parser: argparse.ArgumentParser, config_required: bool = False):
    parser.add_argument('--config', required=config_required, help='YAML run configuration')
    parser.add_argument('--seed', type=int, help='64-bit seed (mandatory unless the config sets one)')
    parser.add_argument('--replications', type=int, help='number of independent masks')
    parser.add_argument('--out-dir', dest='out_dir', help='output directory')
    parser.add_argument('--data', help="'mtcars', 'mtcars01' or a CSV path")
    parser.add_argument('--workers', type=int, help='worker threads for row-parallel sampling')


def _add_copula_flags(parser: argparse.ArgumentParser):
    parser.add_argument('--copula', choices=COPULA_CHOICES, default='independence')
    parser.add_argument('--copula-config', dest='copula_config', help='YAML file holding one copula mapping')
    parser.add_argument('--dim', type=int, default=2)
    parser.add_argument('--rho', type=float)


class AmputeCliApp:
    """Argument parsing and dispatch; one handler per subcommand"""

    def __init__(self, amputation_core, out=None, err=None):
        self.amputation_core = amputation_core
        self.err = err or sys.stderr
        self.handlers = CommandHandlers(amputation_core, out)
        self.parser = self._build_parser()
        self.routes: Dict[str, Callable[[argparse.Namespace], Dict[str, Any]]] = {}
        self._setup_routes()

    def _build_parser(self) -> argparse.ArgumentParser:
        parser = argparse.ArgumentParser(
            prog='ampute', description='Copula-driven amputation of complete datasets')
        parser.add_argument('--version', action='version', version=f"%(prog)s {Config.get_version()}")
        parser.add_argument('-v', '--verbose', action='count', default=0, help='-v info, -vv debug')
        parser.add_argument('--log-file', dest='log_file', action='store_true',
                            help='also log to a dated file in AMPUTE_LOG_FOLDER')
        parser.add_argument('--status', action='store_true', help='print toolkit settings and exit')
        sub = parser.add_subparsers(dest='command', metavar='COMMAND')

        ampute = sub.add_parser('ampute', help='run an amputation configuration')
        _add_run_flags(ampute, config_required=True)

        scenario = sub.add_parser('scenario', help='scenario-based amputation')
        _add_run_flags(scenario, config_required=True)
        scenario.add_argument('--emit-assignment', dest='emit_assignment', action='store_true',
                              help='write the scenario index of every row')

        monotone = sub.add_parser('monotone', help='monotone amputation (config or beta-mixture flags)')
        _add_run_flags(monotone)
        monotone.add_argument('--alpha', type=float, default=1.0)
        monotone.add_argument('--beta', type=float, default=1.0)
        monotone.add_argument('--miss-row-prob', dest='miss_row_prob', type=float, default=1 / 3)
        monotone.add_argument('--dependence', choices=('independence', 'gauss', 'comonotone'),
                              default='independence', help='row dependence of the cutoff uniforms')

        analyze = sub.add_parser('analyze', help='joint probabilities and indicator correlations')
        analyze.add_argument('quantity', choices=('joint', 'correlation', 'bounds'))
        _add_copula_flags(analyze)
        analyze.add_argument('--p', type=float, nargs='+', default=[0.5],
                             help='marginal probabilities (one value is broadcast)')
        analyze.add_argument('--p1', type=float, default=0.5)
        analyze.add_argument('--p2', type=float, default=0.5)
        analyze.add_argument('--mc-samples', dest='mc_samples', type=int,
                             help='Monte-Carlo fallback when exact evaluation is unavailable')
        analyze.add_argument('--seed', type=int, help='seed for the Monte-Carlo fallback')

        coeffs = sub.add_parser('coeffs', help='logistic coefficients implied by a probability band')
        coeffs.add_argument('--p', type=float, required=True)
        coeffs.add_argument('--eps', type=float, required=True)
        coeffs.add_argument('--cmin', type=float, default=0.0)
        coeffs.add_argument('--cmax', type=float, default=1.0)
        coeffs.add_argument('--k', type=int, default=1, help='number of covariates')

        simulate = sub.add_parser('simulate', help='bias study of the mean under amputation')
        _add_run_flags(simulate)
        simulate.add_argument('--estimator', choices=('complete-case', 'pmm-mice'))
        simulate.add_argument('--boxplot', action='store_true', help='also write bias_boxplot.png')
        simulate.add_argument('--preset', choices=sorted(BIAS_PRESETS), help='imputation settings preset')
        simulate.add_argument('--rho', dest='rhos', type=float, nargs='+',
                              help='Gauss correlations of the default mechanism grid')

        impute = sub.add_parser('impute', help='FCS + predictive mean matching on an amputed CSV')
        impute.add_argument('--input', required=True)
        impute.add_argument('--out-dir', dest='out_dir', default='output')
        impute.add_argument('--seed', type=int)
        impute.add_argument('--imputations', type=int, default=Config.PMM_IMPUTATIONS)
        impute.add_argument('--iterations', type=int, default=Config.PMM_ITERATIONS)
        impute.add_argument('--donors', type=int, default=Config.PMM_DONORS)

        render = sub.add_parser('render', help='heatmap of a dataset (.ppm or .svg)')
        render.add_argument('--input', required=True, help="CSV path, 'mtcars' or 'mtcars01'")
        render.add_argument('--output', required=True)
        render.add_argument('--palette', default=Config.DEFAULT_PALETTE)
        render.add_argument('--cell-size', dest='cell_size', type=int, default=Config.CELL_SIZE)
        return parser

    def _setup_routes(self):
        for name in ('ampute', 'scenario', 'monotone', 'analyze', 'coeffs', 'simulate', 'impute', 'render'):
            self.routes[name] = getattr(self.handlers, name)

    def parse(self, argv: Optional[List[str]] = None) -> argparse.Namespace:
        return self.parser.parse_args(argv)

    def _fail(self, error_type: str, message: str, code: int) -> int:
        self.err.write(json.dumps({'error': error_type, 'message': message}) + "\n")
        return code

    def dispatch(self, args: argparse.Namespace) -> int:
        if args.status:
            self.handlers.status()
            return EXIT_OK
        if not args.command:
            self.parser.print_usage(self.err)
            return EXIT_USAGE
        try:
            result = self.routes[args.command](args)
        except ConfigError as e:
            return self._fail(type(e).__name__, str(e), EXIT_USAGE)
        except (AmputationError, OSError) as e:
            logger.debug("%s failed", args.command, exc_info=True)
            return self._fail(type(e).__name__, str(e), EXIT_RUNTIME)
        if not result.get('success', False):
            code = EXIT_USAGE if result.get('error_type') == 'ConfigError' else EXIT_RUNTIME
            return self._fail(result.get('error_type', 'AmputationError'), result.get('error', ''), code)
        return EXIT_OK

    def run(self, argv: Optional[List[str]] = None) -> int:
        try:
            args = self.parse(argv)
        except SystemExit as e:
            return int(e.code or 0)
        return self.dispatch(args)
