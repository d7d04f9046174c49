"""Allow running as: python -m persistence_cdga"""

from .main import main

if __name__ == "__main__":
    main()
