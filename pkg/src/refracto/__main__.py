from refracto.cli import main

main()
