from radbound._radbound import *  # noqa: F401,F403
from radbound._radbound import __version__  # noqa: F401
