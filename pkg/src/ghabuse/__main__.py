import sys

from ghabuse.cli import main

sys.exit(main())
