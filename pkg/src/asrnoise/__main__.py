import sys

from asrnoise.cli import main

sys.exit(main())
