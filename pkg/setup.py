from setuptools import setup, find_packages
import os

def read_requirements():
    if os.path.exists('requirements.txt'):
        with open('requirements.txt', encoding='utf-8') as req_file:
            return [line for line in req_file.read().splitlines() if line and not line.startswith('pytest')]
    return []

def read_readme():
    if os.path.exists('README.md'):
        with open('README.md', encoding='utf-8') as readme_file:
            return readme_file.read()
    return ""

setup(
    name='fclsh',
    version='0.1.0',
    description='Exact Hamming-space r-near-neighbour search with fast covering LSH.',
    long_description=read_readme(),
    long_description_content_type='text/markdown',
    packages=find_packages(exclude=['tests', 'tests.*']),
    classifiers=[
        'Programming Language :: Python :: 3',
        'Operating System :: OS Independent',
        'Topic :: Software Development :: Libraries',
        'Topic :: Scientific/Engineering :: Information Analysis',
        'Development Status :: 3 - Alpha',
        'Natural Language :: English'
    ],
    install_requires=read_requirements(),
    extras_require={'test': ['pytest>=7']},
    python_requires='>=3.10',
    include_package_data=True,
    package_data={'fclsh': ['data/*.json']},
    entry_points={'console_scripts': ['fclsh=fclsh.cli:main']},
)
