"""
Entry point for `python -m csegeo`.
"""

import sys

from csegeo.main import main

sys.exit(main())
