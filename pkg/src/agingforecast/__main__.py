import sys

from agingforecast.bench.cli import main

sys.exit(main())
