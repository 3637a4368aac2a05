import sys

from inspectsim.cli import main

sys.exit(main())
