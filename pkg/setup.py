from setuptools import setup, find_packages

setup(name='graphband',
      version='0.1',
      description='Contextual bandits with graph feedback: AdaCB.G, baselines and '
                  'a reproducible regret harness.',
      license='MIT',
      packages=find_packages(exclude="test"),
      python_requires='>=3.7',
      install_requires=[
          'numpy>=1.17',
          'networkx>=2.4',
          'joblib>=0.14',
          'pandas>=1.5',
      ],
      tests_require=[
          'mock',
          'scipy',
      ],
      extras_require={
          'test': ['mock', 'scipy'],
      },
      entry_points={
          'console_scripts': ['graphband=graphband.cli:main'],
      })
