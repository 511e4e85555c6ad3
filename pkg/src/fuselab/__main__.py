import sys

from fuselab.cli import main

sys.exit(main())
