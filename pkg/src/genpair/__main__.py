"""Allow ``python3 -m genpair``."""

import sys

from .cli import main

sys.exit(main())
