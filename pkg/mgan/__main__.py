""" `python -m mgan` """

import sys

from mgan.cli import main

sys.exit(main())
