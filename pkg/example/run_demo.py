# run_demo.py

import argparse
import os

from msqgforge import Forge, load_config

HERE = os.path.dirname(os.path.abspath(__file__))


def main():
    parser = argparse.ArgumentParser(description="msqg-forge demo runs")
    parser.add_argument("mode", nargs="?", choices=("additive", "multiplicative"), default="additive")
    parser.add_argument("--verify", action="store_true", help="run the invariant suite instead")
    args = parser.parse_args()

    config = load_config(os.path.join(HERE, f"demo_{args.mode}.toml"))
    forge = Forge(config)

    if args.verify:
        forge.verify()
    else:
        report = forge.run()
        # report["stages"][-1]["inductive"] holds the hypothesis rows of the last stage
        print(f"{len(report['stages'])} stages written to {config.output.directory}")


if __name__ == "__main__":
    main()
