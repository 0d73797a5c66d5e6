"""Exception types shared across the package.

InputError covers malformed files, inconsistent shapes, and bad parameter
values; the CLI maps it to exit code 2. ComputeError covers numerical
failures in otherwise valid runs; the CLI maps it to exit code 1.
"""


class VoxelscoreError(Exception):
    pass


class InputError(VoxelscoreError):
    pass


class ComputeError(VoxelscoreError):
    pass
