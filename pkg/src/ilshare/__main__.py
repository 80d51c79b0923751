import sys

from ilshare.cli import main

sys.exit(main())
