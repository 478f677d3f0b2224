"""Allow running as `python -m axbwave`."""

from axbwave.cli import main

main()
