# app/__main__.py
import sys

from app.cli.main import main

sys.exit(main())
