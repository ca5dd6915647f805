import sys

from banglambek.cli import main

sys.exit(main())
