"""Entry point for ``python -m tropical_adp``."""

import sys

from .cli import main

sys.exit(main())
