from setuptools import setup, find_packages

# Load the contents of the README.md file.
with open('README.md', 'r', encoding='utf-8') as f:
    long_description = f.read()

setup(
    name='puncvol',
    version='0.1.0',
    description='Volume, Euler-form flux and Poincare indices of unit vector fields on punctured odd spheres',
    long_description=long_description,
    long_description_content_type='text/markdown',
    install_requires=[
        'numpy>=1.22',
        'scipy',
        'sympy>=1.9'
    ],
    extras_require={
        'test': ['pytest', 'hypothesis'],
    },
    entry_points={
        'console_scripts': ['puncvol = puncvol.cli:main'],
    },
    packages=find_packages(exclude=['tests']),
    keywords=['unit vector fields', 'volume functional', 'Euler class', 'Poincare index', 'spherical quadrature'],
    python_requires='>=3.8',
    classifiers=[
        'Programming Language :: Python :: 3.8',
        'Programming Language :: Python :: 3.9',
        'Programming Language :: Python :: 3.10',
        'Programming Language :: Python :: 3.11',
        'Programming Language :: Python :: 3.12',
        'License :: OSI Approved :: MIT License',
        'Operating System :: OS Independent',
    ],
)
