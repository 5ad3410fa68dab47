import sys

from qbroadcast.cli import main

sys.exit(main())
