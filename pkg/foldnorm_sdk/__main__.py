"""python -m foldnorm_sdk"""
import sys

from foldnorm_sdk.cli import main

if __name__ == "__main__":
    sys.exit(main())
