import sys

from sparsejl.cli import main

sys.exit(main())
