import sys

from lai.bench import main

sys.exit(main())
