"""Allow ``python -m pashto_textclf``."""

import sys

from .harness.cli import main

sys.exit(main())
