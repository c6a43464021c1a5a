from setuptools import setup
from schrosym.constants import VERSION


if __name__ == '__main__':
    setup(
        name='schrosym',
        packages=['schrosym', 'schrosym.controller'],
        version=VERSION,
        install_requires=['numpy', 'scipy', 'mpmath', 'docopt', 'PyYAML', 'h5py'],
        extras_require={'test': ['pytest']},
        entry_points={
          'console_scripts': [
              'schrosym = schrosym.main:main'
          ]
        },
        include_package_data=True,
        zip_safe=False,
        description='Checks and simulations for the nonlocal symmetries of Schrodinger equations',
        keywords=['schrodinger', 'symmetry', 'pseudospectral', 'nonlinear', 'physics'],
        classifiers=['Development Status :: 3 - Alpha',
                     'Natural Language :: English',
                     'Intended Audience :: Science/Research',
                     'Operating System :: POSIX :: Linux',
                     'Programming Language :: Python :: 3',
                     'Topic :: Scientific/Engineering :: Physics',
                     ]
    )
