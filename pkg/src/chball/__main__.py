import sys

from chball.cli import main

sys.exit(main())
