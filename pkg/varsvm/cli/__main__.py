"""Main entry point when running varsvm.cli as a module."""

from varsvm.cli.main import main

if __name__ == "__main__":
    main()
