#  -*- mode: python; mode: fold -*-
#
#  License: MIT
#
#  Part of cascade-sim
#

"""python -m cascade_sim"""

import sys

from .cascade_sim import CascadeSim


def main() -> None:
    sys.exit(CascadeSim().run())


if __name__ == "__main__":
    main()
