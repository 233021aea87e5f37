import sys

from phenocalc.src.cli import main

sys.exit(main())
