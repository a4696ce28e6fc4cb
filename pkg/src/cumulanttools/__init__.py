from . import main as main  # re-export CLI module for entry-point compatibility
