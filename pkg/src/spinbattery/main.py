import sys
from pathlib import Path

# `python src/spinbattery/main.py` runs without an install.
if __name__ == "__main__":
    SRC_DIR = str(Path(__file__).resolve().parent.parent)
    if SRC_DIR not in sys.path:
        sys.path.insert(0, SRC_DIR)

from spinbattery.cli import cli_main
from spinbattery.logger import get_logger


def main():
    """Main entry point for the spinbattery command."""
    logger = get_logger("main")

    try:
        status = cli_main()
    except KeyboardInterrupt:
        logger.info("Run interrupted by user")
        print("\nRun interrupted by user.", file=sys.stderr)
        sys.exit(130)
    except Exception as e:
        logger.error(f"Unexpected error: {e}", exc_info=True)
        print(f"Unexpected error: {e}", file=sys.stderr)
        sys.exit(1)
    sys.exit(status)


if __name__ == "__main__":
    main()
