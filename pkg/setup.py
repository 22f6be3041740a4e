from setuptools import setup, find_packages

setup(
    # Basic info
    name='fracwill',
    version='0.0',
    description='Fractional mean curvature and nonlocal Willmore energy of planar curves.',
    long_description='''\
This implements quadrature for the fractional (nonlocal) mean curvature of
planar curves, the scaling-invariant nonlocal Willmore energy, the
one-dimensional fractional Sobolev machinery around it, and a
convexity-constrained descent over support-function curves, together with a
suite runner which checks the numerical behavior against known properties.
''',
    classifiers=[
        'Development Status :: 4 - Beta',
        'Intended Audience :: Science/Research',
        'Operating System :: POSIX',
        'Programming Language :: Python',
        'Topic :: Scientific/Engineering :: Mathematics',
    ],

    # Packages and depencies
    package_dir={
        '': 'src',
    },
    packages=find_packages(where='src'),
    install_requires=[
        'numpy >=1.20',
        'portion >=2.1',
        'psutil',
        'PyYAML',
        'scipy >=1.7',
    ],
    extras_require={},

    # Data files
    package_data={},

    # Scripts
    entry_points={
        'console_scripts': [
            'fracwill = fracwill.cmd:main',
        ],
    },

    # Other configurations
    zip_safe=True,
    platforms='any',
)
