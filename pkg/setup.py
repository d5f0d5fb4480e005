#!/usr/bin/env python
from setuptools import find_packages, setup
packages = find_packages()

with open("README.md", "r") as fh:
    long_description = fh.read()


VERSION = "0.3.0"
setup(name='python-pmlpy',
      version=VERSION,
      long_description=long_description,
      long_description_content_type="text/markdown",
      license='GPLv3',
      packages=find_packages(exclude=['test']),
      package_dir={'pmlpy': 'pmlpy'},
      install_requires=[
                'pandas>=1.0.0',
                'numpy>=1.19.0',
                'scipy>=1.1.0'],
      extras_require={'test': ['pytest>=6.0',
                               'hypothesis>=6.0']},
      entry_points={'console_scripts': ['pmlanalyze=pmlpy.scripts:analyze',
                                        'pmlverify=pmlpy.scripts:verify',
                                        'pmllaplace=pmlpy.scripts:laplace',
                                        'pmlthreshold=pmlpy.scripts:threshold',
                                        'pmlconstruct=pmlpy.scripts:construct']},
      zip_safe=False,
      classifiers=['Programming Language :: Python',
                   'Programming Language :: Python :: 3.8',
                   'Programming Language :: Python :: 3.9',
                   'Programming Language :: Python :: 3.10']
      )
