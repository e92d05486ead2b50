import pathlib
import sys

# prefer the in-tree sources over any installed copy
sys.path.insert(0, str(pathlib.Path(__file__).resolve().parent.parent / "src"))
