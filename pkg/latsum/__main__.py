import sys

from latsum.main import main

sys.exit(main())
