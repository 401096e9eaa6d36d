import sys

from ultraqs.cli import main

sys.exit(main())
