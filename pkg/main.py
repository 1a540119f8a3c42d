# main.py
#!/usr/bin/env python3
"""
🚀 MAIN APPLICATION - Copula-driven Amputation Toolkit
Masks, amputed datasets, joint-missingness analytics and bias studies
"""

import logging
import os
import sys
from datetime import datetime
from typing import List, Optional

# Add project root to path
sys.path.append(os.path.dirname(os.path.abspath(__file__)))

from backend.amputation_core import AmputationCore
from config.settings import Config
from frontend.cli_app import AmputeCliApp

LOG_FORMAT = '%(asctime)s - %(name)s - %(levelname)s - %(message)s'


def setup_logging(verbosity: int = 0, log_file: bool = False):
    """Setup application logging; stdout is reserved for results"""

    if verbosity >= 2:
        level = logging.DEBUG
    elif verbosity == 1:
        level = logging.INFO
    else:
        level = getattr(logging, Config.LOG_LEVEL.upper(), logging.WARNING)

    handlers = [logging.StreamHandler(sys.stderr)]
    if log_file and Config.LOG_FOLDER:
        os.makedirs(Config.LOG_FOLDER, exist_ok=True)
        handlers.append(logging.FileHandler(
            os.path.join(Config.LOG_FOLDER, f'ampute_{datetime.now().strftime("%Y%m%d")}.log')))

    logging.basicConfig(level=level, format=LOG_FORMAT, handlers=handlers, force=True)


def print_banner():
    """Print application banner (stderr)"""

    banner = f"""
    🚀 COPULA AMPUTATION TOOLKIT v{Config.get_version()}
    {'=' * 60}
    🎲 Copula-driven Bernoulli masks for complete datasets
    📊 Joint missingness probabilities and correlation bounds
    🧪 Bias studies with complete-case and PMM estimators
    {'=' * 60}
    """

    print(banner, file=sys.stderr)


def main(argv: Optional[List[str]] = None) -> int:
    """Main application entry point"""

    amputation_core = AmputationCore()
    app = AmputeCliApp(amputation_core)

    try:
        args = app.parse(argv)
    except SystemExit as e:
        return int(e.code or 0)

    setup_logging(args.verbose, args.log_file)
    if args.verbose:
        print_banner()

    logging.getLogger(__name__).info("running %s", args.command or 'status')
    return app.dispatch(args)


if __name__ == '__main__':
    sys.exit(main())
