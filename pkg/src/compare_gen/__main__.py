from compare_gen.cli import main

main()
