"""python -m switchgrade"""

import sys

from .cli import main

sys.exit(main())
