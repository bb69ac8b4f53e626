# Tower package
