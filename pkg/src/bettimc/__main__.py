import sys

from bettimc.cli import main

sys.exit(main())
