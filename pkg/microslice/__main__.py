from microslice.runner.cli import entrypoint

entrypoint()
