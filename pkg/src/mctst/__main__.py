import sys

from mctst.cli import main

sys.exit(main())
