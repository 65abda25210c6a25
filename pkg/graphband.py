#!/usr/bin/env python

from graphband.cli import main

if __name__ == '__main__':
    main()
