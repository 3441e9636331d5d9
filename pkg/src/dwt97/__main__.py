import sys

from dwt97.cli import main

sys.exit(main())
