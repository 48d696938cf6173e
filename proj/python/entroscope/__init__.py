try:
    from ._entroscope import *  # installed wheel layout
except ImportError:
    from _entroscope import *  # in-tree build with the extension on sys.path
