import sys

from tridiag_vqls.cli import main

if __name__ == "__main__":
    sys.exit(main())
