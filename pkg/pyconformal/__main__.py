#!/usr/bin/env python3
"""Allow ``python -m pyconformal``"""

import sys

from .cli import main

sys.exit(main())
