from setuptools import setup, find_packages

setup(
    name='vitalsign',
    version='0.0.1',
    license='BSD',
    entry_points={
        'console_scripts': [
            'vitalsign = vitalsign.commands.vitalsign:main',
        ],
    },

    tests_require=['pytest'],

    install_requires= [
        'construct',
        'tableprint',
        'numpy',
        'scipy',
        'pandas',
        'PyYAML',
    ],
    description='early ICU mortality prediction from heart-rate recordings',
    long_description='toolkit that turns bedside heart-rate recordings into mortality predictions, '
        'from raw record parsing through cross-validated classifier evaluation',
    packages=find_packages(exclude=['tests']),
    include_package_data=True,
    platforms='any',
    classifiers = [
        'Programming Language :: Python',
        'Development Status :: 3 - Alpha',
        'Natural Language :: English',
        'Environment :: Console',
        'Intended Audience :: Science/Research',
        'License :: OSI Approved :: BSD License',
        'Operating System :: OS Independent',
        'Topic :: Scientific/Engineering :: Medical Science Apps.',
        ],
    extras_require={
        'test': ['pytest'],
    }
)
