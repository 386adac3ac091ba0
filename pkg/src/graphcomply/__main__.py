from graphcomply.cli import main

raise SystemExit(main())
