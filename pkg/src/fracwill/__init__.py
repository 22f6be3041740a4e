''' Fractional mean curvature and nonlocal Willmore energy of planar curves.
'''

#: Library version echoed into run manifests
VERSION = '0.0'
