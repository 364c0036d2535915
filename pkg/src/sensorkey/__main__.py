import sys

from sensorkey.cli import main

sys.exit(main())
