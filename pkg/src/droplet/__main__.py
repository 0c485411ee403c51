import sys

from droplet.cli import main

sys.exit(main())
